"""mxserve: serve heterogeneous predictive models behind one REST contract.

The package splits into five layers:

* :mod:`mxserve.core` -- the shared contract: model metadata, the
  prediction envelope, and the three-stage wrapper pipeline.
* :mod:`mxserve.sentiment`, :mod:`mxserve.detector`, :mod:`mxserve.pgm` --
  two deterministic reference models (a bag-of-words sentiment classifier
  and a connected-components object detector) plus the PGM image codec.
* :mod:`mxserve.service` -- the HTTP front that exposes one wrapped model
  behind the standard endpoint set.
* :mod:`mxserve.registry` / :mod:`mxserve.registry_service` -- the
  exchange: a catalog of running model services with health polling and
  a prediction proxy.
* :mod:`mxserve.scaffold`, :mod:`mxserve.conformance`, :mod:`mxserve.cli`
  -- tooling to generate new model services and validate live ones.
"""

__version__ = "0.1.0"
