import os
import random
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from amrtext.amr import parse_penman  # noqa: E402

TOY_DIR = os.path.join(os.path.dirname(__file__), "..", "src", "amrtext", "data", "toy")

# A multi-sentence AMR whose "i" node is reentrant three times; verbatim layout.
MULTI = """(m / multi-sentence
      :snt1 (w2 / wish-01
            :ARG0 (i2 / i)
            :ARG1 (p / possible-01
                  :ARG1 (w3 / wipe-out-02
                        :ARG0 i2
                        :ARG1 (s / she)
                        :source (l / live-01
                              :ARG0 i2))))
      :snt2 (g / good-02
            :ARG1 (t / thing)
            :degree (m2 / more
                  :degree (m3 / much
                        :degree (s2 / so)))
            :prep-without (s3 / she)))"""

MULTI_SNT = "I wish I could wipe her out of my life - things would be so much better without her."

WANT = "(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))"


@pytest.fixture
def multi():
    return parse_penman(MULTI)


@pytest.fixture
def want():
    return parse_penman(WANT)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def toy_dir():
    return os.path.abspath(TOY_DIR)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
