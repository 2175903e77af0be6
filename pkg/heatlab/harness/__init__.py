"""Verification suites, fit machinery, reports and the batch runner."""
