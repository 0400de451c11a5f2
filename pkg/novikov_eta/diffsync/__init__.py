"""DiffSync adapters and models comparing E∞ dimension tables between routes."""
