"""Tour of the sentence- and corpus-level metrics.

BLEU with clipped precisions and add-one smoothing, chrF++ over character
plus word n-grams, and the Self-BLEU diversity baseline.
"""

from multiscore import (
    BleuConfig,
    corpus_bleu,
    self_bleu,
    sentence_bleu,
    sentence_chrfpp,
)
from multiscore.metrics import SMOOTH_NONE

# --- BLEU -----------------------------------------------------------------

print("identity:", sentence_bleu("the cat sat on the mat", ["the cat sat on the mat"]))

# clipping in action: "the" appears 7 times in the hypothesis but at most
# twice in the reference, so unigram precision is 2/7
hyp = "the the the the the the the"
ref = "the cat is on the mat"
print(f"degenerate hypothesis: {sentence_bleu(hyp, [ref]):.2f}")

# multi-reference scoring clips against the best reference per n-gram and
# takes the closest reference length for the brevity penalty
print(
    "multi-reference:",
    round(sentence_bleu("the cat sat", ["the cat sat on a mat", "the cat sat"]), 2),
)

# corpus BLEU pools counts over segments before applying the formula once;
# it is unsmoothed by convention
pairs = [
    ("the cat sat on the mat", ["the cat sat on the red mat", "a cat sat on the mat"]),
    ("he ate the apple pie", ["he ate an apple pie", "he devoured the apple pie"]),
]
print(f"corpus BLEU over two segments: {corpus_bleu(pairs):.2f}")
print(
    "same segments, sentence-smoothed and macro-averaged:",
    round(sum(sentence_bleu(h, r) for h, r in pairs) / 2, 2),
)

# --- chrF++ ----------------------------------------------------------------

print("\nchrF++ identity:", sentence_chrfpp("Ужин готов .", "Ужин готов ."))
print(f"chrF++ near miss: {sentence_chrfpp('abc', 'abd'):.2f}")
print(f"chrF++ paraphrase: {sentence_chrfpp('the cat sat', 'a cat was sitting'):.2f}")

# --- Self-BLEU --------------------------------------------------------------

# higher Self-BLEU = the set repeats itself = less diverse
copies = ["the cat sat", "the cat sat", "the cat sat"]
varied = ["the cat sat on the mat", "a dog ran far away", "big sky over the old town"]
print(f"\nSelf-BLEU, three identical outputs: {self_bleu(copies):.2f}")
print(f"Self-BLEU, three unrelated outputs:  {self_bleu(varied):.2f}")

unsmoothed = BleuConfig(smoothing=SMOOTH_NONE)
print("note: Self-BLEU uses smoothed sentence BLEU; unsmoothed order-4 on")
print("      short sentences would floor at", self_bleu(copies[:2] + ["the cat"], unsmoothed))
