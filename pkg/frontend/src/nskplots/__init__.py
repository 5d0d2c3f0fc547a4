"""Figure reproduction for the 1-D NSK/EK simulator CSV outputs."""

__version__ = "0.1.0"
