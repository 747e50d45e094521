"""
Celery tasks for background processing.
"""

from celery import shared_task
import logging

logger = logging.getLogger(__name__)


@shared_task
def generate_session(user_id, profile_document, config_document, single_pass=False):
    """
    Run one generate-then-edit session on a worker.
    Arguments and result are plain JSON so the json serializer carries them.
    """
    from .agent_service import run_session
    from .config import RunConfig
    from .schedule import UserProfile

    config = RunConfig(**config_document)
    result = run_session(
        user_id,
        UserProfile.from_mapping(profile_document),
        config.endpoint(),
        bounds=config.duration_bounds(),
        rules=config.commonsense_rules(),
        single_pass=single_pass,
        gap_extend_minutes=config.gap_extend_minutes,
        coherence=config.coherence_limits(),
    )
    logger.info(f'Session {user_id} finished after {result["rounds"]} editor rounds')
    return result
