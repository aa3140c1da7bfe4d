"""Multi-task attentional sequence-to-sequence training with partial
layer sharing and adversarial task confusion."""

__version__ = "0.1.0"
