"""Utils package: logging, metrics, validators, files."""
