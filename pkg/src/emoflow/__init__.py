"""Emotion detection for chat messages: text classifiers fused with emoji sentiment."""
from .fusion import EmotionDistribution, ScoredMessage, dominant_emotion, fuse, score_message, softmax
from .lexicon import SentimentLexicon, extract_emojis, intensity_factor, load_lexicon, message_intensities

__version__ = "0.1.0"

__all__ = [
    "EmotionDistribution", "ScoredMessage", "SentimentLexicon", "dominant_emotion", "extract_emojis", "fuse",
    "intensity_factor", "load_lexicon", "message_intensities", "score_message", "softmax",
]
