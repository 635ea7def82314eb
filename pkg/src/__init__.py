# DriftSurf Benchmark
# Streaming learning under concept drift
