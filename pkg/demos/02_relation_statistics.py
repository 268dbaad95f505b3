"""Walkthrough: conditional probability, weight level, relation, intensity.

Starts from the four-sentence corpus where a single discourse-emotion pair
co-occurs with low confidences, then shows how the weight level separates
strong from incidental co-occurrence, and ends with a mixed corpus and its
normalized table.
"""
from demrel import (
    Discourse,
    RelateConfig,
    SentenceRef,
    SentenceView,
    conditional_probability,
    relation_table,
    weight_level,
)
from demrel.conformance import numeric_example_views
from demrel.report import probability_table_text

M, H = Discourse.MASTER, Discourse.HYSTERIC

# --- the classic four-sentence case -------------------------------------
views = numeric_example_views()
d, e = frozenset({M}), frozenset({"joy"})

prob = conditional_probability(d, e, views)
print(f"Prob({{M}} | {{joy}}) = {prob}")
print("  (the emotion never appears with any other discourse set, so the")
print("   probability is 1 even though every confidence is low)")

w_product = weight_level(d, e, views, "product")
w_sum = weight_level(d, e, views, "sum")
print(f"weight level, product mode: {w_product:.3f}")
print(f"weight level, sum mode:     {w_sum:.1f}")

table = relation_table(views, RelateConfig(tau=0.0))
entry = table.entries[0]
print(f"relation  = prob x weight = {entry.relation:.3f}")
print(f"intensity = relation / class max = {entry.ri}\n")

# --- a corpus with competing discourse sets ------------------------------


def view(i, d_conf, d_weight, e_conf):
    return SentenceView(SentenceRef("demo", i), d_conf, d_weight, e_conf)


mixed = [
    view(0, {M: 1.0}, {M: 1.0}, {"joy": 0.9}),
    view(1, {H: 1.0}, {H: 0.8}, {"joy": 0.9}),
    view(2, {M: 1.0, H: 1.0}, {M: 0.6, H: 0.6}, {"joy": 0.9}),
    view(3, {M: 0.6}, {M: 0.8}, {"anxiety": 0.7, "joy": 0.4}),
]
table = relation_table(mixed)
print("entries over the mixed corpus (note each emotion row sums to 1):")
for entry in table.entries:
    print(f"  {{{entry.emotion_key}}} x {{{entry.discourse_key}}}: "
          f"prob={entry.prob:.4f} W={entry.weight_level:.3f} "
          f"R={entry.relation:.4f} RI={entry.ri:.2f}")

print("\nprobability matrix (CSV):")
print(probability_table_text(table))
