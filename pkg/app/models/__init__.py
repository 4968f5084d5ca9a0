"""Pydantic models package for the rainfall forecasting benchmark."""
