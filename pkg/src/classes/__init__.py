"""Classes for the f-convolution toolkit."""
