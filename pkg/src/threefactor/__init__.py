"""Comparative statics of the three-factor two-good trade model."""
