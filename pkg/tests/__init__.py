"""Test package for hamdecomp."""
