"""Headless sound-memory composition engine.

Compose an audio piece over a photo: detected objects get sound effects,
a conversational flow generates background music, taps while recording
place one-shot effects on a timeline, and an offline mixer renders the
result to WAV. A statistics module covers questionnaire scoring and
paired-comparison analysis for evaluating such tools.
"""

__version__ = "0.1.0"
