"""Semi-automated construction of a food-chemical knowledge base.

Pipeline: retrieve entity-tagged literature sentences, generate candidate
*contains* relations, label them with a two-annotator consensus workflow
driven by pool-based active learning, and aggregate the positives into an
evidence-backed knowledge base with full statistical evaluation.
"""

__version__ = "0.1.0"
