"""Class-imbalance toolkit for short-text classification.

Pipeline pieces compose sklearn-style: TextCleaner and WordPieceTokenizer
are transformers, EdaAugmenter / RandomOversampler / IqrLengthFilter
resample, MeanPoolTextClassifier fits and predicts. The same operations are
available as plain functions for scripted use, and `imbtext` on the command
line drives the full experiment grid.
"""

from .augment import (
    AugmentConfig,
    EdaAugmenter,
    SynonymLexicon,
    augment_all,
    eda_augment,
    expand_minority,
    random_delete,
    random_insert,
    random_swap,
    synonym_replace,
)
from .data import (
    DEFAULT_SCHEMA,
    Dataset,
    LabelCodec,
    Record,
    fit_label_codec,
    load_dataset,
    save_dataset,
    split,
)
from .experiment import (
    ExperimentSpec,
    ResultRow,
    StageError,
    load_specs,
    run_config,
    run_grid,
)
from .losses import EPS, FocalParams, cross_entropy, focal_loss
from .metrics import ScoreReport, confusion, scores
from .model import (
    BackboneConfig,
    ModelCheckpoint,
    forward,
    load_checkpoint,
    predict,
    save_checkpoint,
)
from .optim import AdamWState, adamw_step, init_adamw_state, lr_at
from .oversample import RandomOversampler, SamplingPlan, apply_plan, make_plan, plan_report
from .preprocess import (
    CleanConfig,
    IqrConfig,
    IqrLengthFilter,
    TextCleaner,
    clean_text,
    iqr_filter,
    lemmatize_token,
    load_stopwords,
)
from .seeding import derive_seed
from .synth import gen_synthetic, gen_synthetic_lexicon
from .training import LR_PROFILES, MeanPoolTextClassifier, TrainConfig, train
from .wordpiece import (
    TokenSeq,
    VocabModel,
    WordPieceTokenizer,
    decode,
    encode,
    load_vocab,
    train_vocab,
    unk_count,
    word_pieces,
)

__version__ = "0.1.0"
