"""Dental arch learning pipeline.

Subpackages:
    mesh    -- triangle mesh I/O, repair, simplification, subdivision remeshing,
               patch extraction, point sampling
    synth   -- synthetic dental arch generator and labeled dataset builder
    nn      -- dense tensors with reverse-mode autodiff, neural blocks, losses,
               optimizer
    pretrain -- masked autoencoder pretraining of the mesh encoder
    sites   -- implant-site multi-label classifier and its metrics
    regress -- tooth-conditioned multi-expert abutment parameter regression
    report  -- interval-IoU evaluation and binned reporting
"""

__version__ = "0.1.0"
