"""Desk-scale denoising seq2seq laboratory.

Subpackages: text normalization, subword tokenizer, noising, a
from-scratch encoder-decoder transformer with reverse-mode autodiff,
training loops, beam-search decoding, ROUGE/abstractiveness metrics,
and data handling.  See the CLI in :mod:`arasum.cli`.
"""

__version__ = "0.1.0"
