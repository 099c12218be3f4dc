"""Training-side tools for the support-extraction U-Net."""
