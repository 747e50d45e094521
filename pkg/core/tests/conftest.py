import random

import pytest

from core.llm_service import ChatEndpoint
from core.mock_data import (
    CASE_STUDY_DRAFT,
    CASE_STUDY_EDITED,
    CASE_STUDY_GROUND_TRUTH,
    case_study_profile,
)


@pytest.fixture
def profile():
    return case_study_profile()


@pytest.fixture
def draft():
    return CASE_STUDY_DRAFT


@pytest.fixture
def edited():
    return CASE_STUDY_EDITED


@pytest.fixture
def ground_truth():
    return CASE_STUDY_GROUND_TRUTH


@pytest.fixture
def endpoint():
    return ChatEndpoint(model_name='test-model', provider='mock', max_rounds=3, max_retries=3, retry_backoff=0)


@pytest.fixture
def rng():
    return random.Random(1234)
