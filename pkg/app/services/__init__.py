"""Services package: MARS, neural networks, series handling and the benchmark pipeline."""
