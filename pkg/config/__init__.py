"""Configuration package for the rainfall forecasting benchmark."""
