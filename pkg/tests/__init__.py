"""Test package for the rainfall forecasting benchmark."""
