"""Simulator of the SLM-pair quantum spectrometer."""
