from django.db import models
import uuid


class GenerationRun(models.Model):
    """One `generate` invocation: resolved config plus outcome counts"""

    MODE_CHOICES = [
        ('editor', 'Generate-then-edit'),
        ('single_pass', 'Single pass'),
    ]

    STATUS_CHOICES = [
        ('running', 'Running'),
        ('completed', 'Completed'),
        ('failed', 'Failed'),
    ]

    id = models.UUIDField(primary_key=True, default=uuid.uuid4, editable=False)
    mode = models.CharField(max_length=20, choices=MODE_CHOICES, default='editor')
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default='running')
    endpoint = models.CharField(max_length=255, blank=True)
    config = models.JSONField(default=dict)  # RunConfig snapshot, no secrets
    profile_count = models.IntegerField(default=0)
    fallback_count = models.IntegerField(default=0)
    total_rounds = models.IntegerField(default=0)
    error = models.TextField(blank=True)
    created_at = models.DateTimeField(auto_now_add=True)
    completed_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        db_table = 'generation_runs'
        ordering = ['-created_at']

    def __str__(self):
        return f"Run {self.id} ({self.status}, {self.profile_count} profiles)"


class GenerationSession(models.Model):
    """One user's generate-then-edit session within a run"""

    id = models.UUIDField(primary_key=True, default=uuid.uuid4, editable=False)
    run = models.ForeignKey(GenerationRun, on_delete=models.CASCADE, related_name='sessions')
    user_id = models.CharField(max_length=100)
    profile = models.JSONField(default=dict)
    draft = models.JSONField(default=list)
    schedule = models.JSONField(default=list)
    provenance = models.JSONField(default=list)  # one record per round
    rounds = models.IntegerField(default=0)
    fallback_used = models.BooleanField(default=False)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        db_table = 'generation_sessions'
        ordering = ['created_at']
        unique_together = ['run', 'user_id']

    def __str__(self):
        return f"{self.user_id} ({self.rounds} rounds{', fallback' if self.fallback_used else ''})"
