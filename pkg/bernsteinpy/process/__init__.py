"""Verification layer: estimators, oracles and check orchestration."""
