"""Utility helpers for the rainfall forecasting benchmark."""
