"""Hand-traced (generated, truth) workflow pairs with manually derived scores.

Each expected value was derived on paper from the pinned scoring rules:
uses/uses pairs score 1.0 on full match and 0.5 on same action with a
different @ref; run/run pairs score 1.0 on normalized equality else BLEU over
command tokens (exactly 0.0 when no token is shared); mixed pairs score BLEU
over flattened step text; unmatched truth steps score 0; the result is the
mean over the truth's build/test steps.
"""
import math

IDENTITY_WF = """\
name: ci
on:
  push:
    branches: [main]
jobs:
  test:
    runs-on: ubuntu-latest
    steps:
      - uses: actions/checkout@v4
      - uses: actions/setup-python@v5
        with:
          python-version: "3.12"
      - run: pip install -e .
      - run: pytest
"""

WORKED_TRUTH = """\
on:
  push: {}
jobs:
  test:
    runs-on: ubuntu-latest
    steps:
      - uses: actions/setup-node@v3
      - run: npm test
"""

WORKED_GEN = """\
on:
  push: {}
jobs:
  test:
    runs-on: ubuntu-latest
    steps:
      - uses: actions/setup-node@v4
      - run: npm test
"""

MISSING_TRUTH = """\
on:
  push: {}
jobs:
  test:
    runs-on: ubuntu-latest
    steps:
      - uses: actions/setup-python@v5
      - run: pytest
"""

MISSING_GEN = """\
on:
  push: {}
jobs:
  install-only:
    runs-on: ubuntu-latest
    steps:
      - uses: actions/setup-python@v5
"""

FOURWAY_TRUTH = """\
on:
  push: {}
jobs:
  test:
    runs-on: ubuntu-latest
    steps:
      - uses: actions/checkout@v4
      - uses: actions/setup-java@v4
      - run: mvn -B package
      - name: Unit tests
        run: mvn test
"""

FOURWAY_GEN = """\
on:
  push: {}
jobs:
  maven:
    runs-on: ubuntu-latest
    steps:
      - uses: actions/checkout@v4
      - uses: actions/setup-java@v3
      - run: mvn -B package
      - name: Unit tests
        run: ./gradlew check
"""

CROSSKIND_TRUTH = """\
on:
  push: {}
jobs:
  build:
    runs-on: ubuntu-latest
    steps:
      - name: Install deps
        run: pip install -r requirements.txt
"""

CROSSKIND_GEN = """\
on:
  push: {}
jobs:
  setup:
    runs-on: ubuntu-latest
    steps:
      - name: Install deps
        uses: actions/setup-python@v5
"""

DEGENERATE_TRUTH = """\
on:
  push: {}
jobs:
  deploy:
    runs-on: ubuntu-latest
    steps:
      - uses: actions/checkout@v4
      - run: aws s3 sync ./public s3://bucket
"""

DEGENERATE_GEN = """\
on:
  push: {}
jobs:
  upload:
    runs-on: ubuntu-latest
    steps:
      - run: rsync -a public/ server:/var/www
"""

# Mixed-kind pair: candidate = flattened generated step (5 tokens:
# "name: Install deps uses: actions/setup-python@v5"), reference = flattened
# truth step (8 tokens: "name: Install deps run: pip install -r
# requirements.txt").  Unigrams 3/5, bigrams 2/4, trigrams 1/3, 4-grams
# 0 -> epsilon/2; brevity penalty exp(1 - 8/5).
CROSSKIND_EXPECTED = math.exp(1 - 8 / 5) * (
    (3 / 5) * (2 / 4) * (1 / 3) * ((1e-9) / 2)
) ** (1.0 / 4)

# (name, generated, truth, expected)
DEVOPS_TRACES = [
    # identical workflows: every aligned pair scores 1.0
    ("identity", IDENTITY_WF, IDENTITY_WF, 1.0),
    # same action different @ref (0.5) + identical run (1.0) -> 0.75
    ("worked-075", WORKED_GEN, WORKED_TRUTH, 0.75),
    # full uses match (1.0) + truth step with no counterpart (0) -> 0.5
    ("unmatched", MISSING_GEN, MISSING_TRUTH, 0.5),
    # 1.0 + 0.5 + 1.0 + name-matched runs sharing no token (0.0) -> 0.625
    ("four-components", FOURWAY_GEN, FOURWAY_TRUTH, 0.625),
    # single name-matched mixed pair scored by BLEU over flattened text
    ("cross-kind-bleu", CROSSKIND_GEN, CROSSKIND_TRUTH, CROSSKIND_EXPECTED),
    # no build/test content on either side
    ("degenerate-empty", DEGENERATE_GEN, DEGENERATE_TRUTH, 1.0),
]
