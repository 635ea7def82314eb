"""Test suite for the DriftSurf streaming benchmark."""
