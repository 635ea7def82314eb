# Evaluation: experiment harness, result records, probes, command-line interface
