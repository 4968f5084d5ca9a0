"""Run tracking and exit-code handling for the command-line front end."""
