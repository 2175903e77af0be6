"""One module per family of verified inequalities; every suite returns a FitReport."""
