# Copyright 2026 The transcheck Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the transcheck C++ core."""

from transcheck._core import (
    TranscheckError,
    __version__,
    bleu_metric,
    consistency_score,
    cosine_similarity,
    detokenize,
    ed_metric,
    lcs_metric,
    learn_threshold,
    modified_precision,
    mutate,
    pos_tag,
    report_histogram,
    run_pipeline,
    tfidf_metric,
    tokenize,
    word_diff,
)

__all__ = [
    "TranscheckError",
    "__version__",
    "bleu_metric",
    "consistency_score",
    "cosine_similarity",
    "detokenize",
    "ed_metric",
    "lcs_metric",
    "learn_threshold",
    "modified_precision",
    "mutate",
    "pos_tag",
    "report_histogram",
    "run_pipeline",
    "tfidf_metric",
    "tokenize",
    "word_diff",
]
