"""Tools package: event logs, synthetic logs, model files, reports, executor."""
