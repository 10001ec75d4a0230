"""Rate regions and optimal mm-wave power allocation for the dual-band
two-user multiple-access relay channel."""
