from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.modules.level_set.config import LSESettings
from app.shared.schemas import Label, Method

# Classification of a single point is the shared Label enum
Classification = Label


class AcquisitionSpec(BaseModel):
    """Which scoring rule ranks candidates, with its parameters"""
    model_config = ConfigDict(frozen=True)

    method: Method = Method.C2LSE
    epsilon: float = Field(LSESettings.EPSILON, gt=0)
    beta: float = Field(LSESettings.BETA, gt=0)
    straddle_scale: float = Field(LSESettings.STRADDLE_SCALE, gt=0)

    @model_validator(mode="after")
    def _check_method(self):
        if self.method == Method.RANDOM:
            raise ValueError("random queries have no acquisition surface")
        return self
