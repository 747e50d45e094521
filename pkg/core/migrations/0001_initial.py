from django.db import migrations, models
import django.db.models.deletion
import uuid


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='GenerationRun',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('mode', models.CharField(choices=[('editor', 'Generate-then-edit'), ('single_pass', 'Single pass')], default='editor', max_length=20)),
                ('status', models.CharField(choices=[('running', 'Running'), ('completed', 'Completed'), ('failed', 'Failed')], default='running', max_length=20)),
                ('endpoint', models.CharField(blank=True, max_length=255)),
                ('config', models.JSONField(default=dict)),
                ('profile_count', models.IntegerField(default=0)),
                ('fallback_count', models.IntegerField(default=0)),
                ('total_rounds', models.IntegerField(default=0)),
                ('error', models.TextField(blank=True)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('completed_at', models.DateTimeField(blank=True, null=True)),
            ],
            options={
                'db_table': 'generation_runs',
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='GenerationSession',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('user_id', models.CharField(max_length=100)),
                ('profile', models.JSONField(default=dict)),
                ('draft', models.JSONField(default=list)),
                ('schedule', models.JSONField(default=list)),
                ('provenance', models.JSONField(default=list)),
                ('rounds', models.IntegerField(default=0)),
                ('fallback_used', models.BooleanField(default=False)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='sessions', to='core.generationrun')),
            ],
            options={
                'db_table': 'generation_sessions',
                'ordering': ['created_at'],
                'unique_together': {('run', 'user_id')},
            },
        ),
    ]
