# Job configuration and report models
