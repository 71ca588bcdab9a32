"""Linear spectral statistics of spiked Hermitian random matrix ensembles."""
