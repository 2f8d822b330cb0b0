# Copyright 2026 The textguide Authors.
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

"""Guided truncation of long labeled texts to a fixed token budget."""

from ._core import (  # noqa: F401
    BoostParams,
    Corpus,
    Sitfl,
    TextguideError,
    TruncationConfig,
    apply_strategy,
    build_sitfl,
    compare_strategies,
    confusion,
    detokenize,
    load_corpus,
    mcc,
    read_sitfl,
    select_features,
    sitfl_from_tokens,
    stratified_folds,
    sweep_csv,
    text_guide,
    text_guide_hybrid,
    tokenize,
    truncate_head,
    truncate_head_tail,
    truncate_tail,
    write_corpus,
    write_sitfl,
)

__version__ = "0.1.0"
