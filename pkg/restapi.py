#
# Copyright 2020 Taylor Petrick
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.
#
import os

from typing import List, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from edgeworth import cli
from edgeworth import config as aee_config
from edgeworth.engine import Derivation, special_case_lambda_form, statistic_kind
from edgeworth.errors import ComputeError, ConfigError
from edgeworth.estimators import R2_FORMS, ModeratedPrior
from edgeworth.logging import Logging
from edgeworth.utils import parse_number

app = FastAPI()

config = aee_config.load(os.environ.get("AEE_CONFIG"))
log = Logging.create(config, Logging.ROOT, "restapi")
derivation = Derivation(config)

class Inputs(BaseModel):
    test: str
    order: int = 2
    moments: dict
    d0: Optional[str] = None
    s02: Optional[str] = None
    equal_variance: bool = False

class EvalRequest(Inputs):
    x: List[float] = []
    p: List[float] = []

class DiagnoseRequest(Inputs):
    step: Optional[float] = None
    width: Optional[float] = None

@app.exception_handler(ConfigError)
def config_error(request: Request, error: ConfigError):
    return JSONResponse(status_code=400, content={"error": str(error)})

@app.exception_handler(ComputeError)
def compute_error(request: Request, error: ComputeError):
    log.error("%s failed: %s", request.url.path, error)
    return JSONResponse(status_code=422, content={"error": str(error)})

def bind(body):
    kind = statistic_kind(body.test)
    if body.order < 1:
        raise ConfigError("order must be at least 1, got {}".format(body.order))

    prior = None
    if body.d0 is not None and body.s02 is not None:
        try:
            prior = ModeratedPrior(parse_number(body.d0), parse_number(body.s02))
        except ValueError as error:
            raise ConfigError("malformed prior: {}".format(error))

    samples = cli.moment_samples(kind, body.moments)
    return cli.bind_moments(kind, body.order, samples, derivation, prior,
        body.equal_variance)

@app.get("/expand/{test}/{order}")
def expand(test: str, order: int, lambda_form: bool = False,
        with_k_table: bool = False):
    kind = statistic_kind(test)
    es = derivation.run(kind.arity, order)
    if lambda_form and kind.ordinary:
        es = special_case_lambda_form(es, kind)
    payload = es.to_json(R2_FORMS[kind.token], with_k_table)
    payload["test"] = kind.token
    return payload

@app.post("/eval")
def evaluate(body: EvalRequest):
    if bool(body.x) == bool(body.p):
        raise ConfigError("give exactly one of x or p")
    if any(not 0 < p < 1 for p in body.p):
        raise ConfigError("probabilities must be in (0, 1)")

    bound, n = bind(body)
    report = cli.scan(config, bound, n)
    return cli.evaluate_rows(bound, n, report, body.x, body.p,
        config.getfloat("diagnostics", "bisect_tol"))

@app.post("/diagnose")
def diagnose(body: DiagnoseRequest):
    bound, n = bind(body)
    return cli.scan(config, bound, n, body.step, body.width).to_json()
