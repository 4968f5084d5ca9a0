"""Controllers package for the rainfall forecasting benchmark."""
