"""Sense disambiguation of compound constituents by APPMI set expansion."""

__version__ = "0.1.0"

from .contexts import ContextKey, ContextTable, Scheme, dependency_context, ngram_context
from .corpus import Sentence, Token, Vocabulary, merge_multiword, parse_conllu, tokenize_plain
from .disambiguation import (DisambiguationAnswer, DisambiguationQuery, SynonymLexicon,
                             disambiguate, load_synonyms, rank_synonyms)
from .errors import (CompsenseError, IndexFormatError, ParseError, PreconditionError,
                     StructuralError, UsageError)
from .evaluation import (EvaluationReport, TestItem, evaluate, evaluate_baseline, fleiss_kappa,
                         load_test_items, rho_sweep)
from .expansion import (ExpansionParams, ExpansionResult, context_fraction, context_mass, expand,
                        expand_terms, restrict)
from .index import (ApmiConfig, ApmiIndex, CooccurrenceCounts, Estimator, LogBase, accumulate,
                    appmi, build_index, index_from_counts, load_index, pmi, probability,
                    save_index)
from .wup import Taxonomy, baseline_disambiguate, depth, load_taxonomy, wup_similarity
