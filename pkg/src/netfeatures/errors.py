class FeatureError(ValueError):
    """Raised when feature engineering inputs do not fit the schema or each other."""
