"""Two-cavity optomechanics simulator with chi-squared channel discrimination."""
__version__ = "0.1.0"
