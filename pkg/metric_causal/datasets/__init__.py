#!/usr/bin/env python3

from .loader import Study, load_landmarks, load_study, load_study_from_cfg, load_units  # noqa
