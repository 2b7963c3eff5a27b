from django.db import models
from taggit.managers import TaggableManager


# A persisted command run (only written with --save)
class ExperimentRun(models.Model):
    command = models.CharField(max_length=50)
    schema = models.PositiveIntegerField(default=1)
    # u64 seeds overflow BigIntegerField
    seed = models.DecimalField(max_digits=20, decimal_places=0, default=0)
    config = models.JSONField(default=dict)
    report = models.JSONField(default=dict)
    passed = models.BooleanField(default=False)
    created_at = models.DateTimeField(auto_now_add=True)
    tags = TaggableManager(blank=True)

    def __str__(self):
        verdict = "pass" if self.passed else "fail"
        return f"{self.command} (seed {self.seed}): {verdict}"

    class Meta:
        ordering = ["-created_at"]
        verbose_name = "Experiment run"
        verbose_name_plural = "Experiment runs"
