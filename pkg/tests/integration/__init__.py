"""Integration tests package for the rainfall forecasting benchmark."""
