"""Rainfall forecasting benchmark application package."""
