"""Cooperative multi-LEO-satellite downlink: hybrid beamforming and user scheduling."""

__version__ = "0.1.0"
