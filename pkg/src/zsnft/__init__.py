"""Direct nonlinear Fourier transform for the focusing Zakharov-Shabat system."""
