"""Model layer: rates, kernels, laws, operators and the three simulators."""
