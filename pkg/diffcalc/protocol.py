# The MIT License (MIT)
# Copyright © 2025 The diffcalc developers

# Permission is hereby granted, free of charge, to any person obtaining a copy of this software and associated
# documentation files (the “Software”), to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of the Software,
# and to permit persons to whom the Software is furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all copies or substantial portions of
# the Software.

# THE SOFTWARE IS PROVIDED “AS IS”, WITHOUT WARRANTY OF ANY KIND, EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO
# THE WARRANTIES OF MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION
# OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
# DEALINGS IN THE SOFTWARE.

# JSON shapes emitted by the command line. Field order is part of the format:
# reports built from identical inputs and seeds serialise identically.

import typing

from pydantic import BaseModel, Field

Verdict = typing.Literal["true", "false", "inconclusive"]


class StepRecord(BaseModel):
    """
    One reduction step.

    Attributes:
    - n: 1-based position in the trace.
    - rule: Name of the rule that fired.
    - path: Redex position, "/"-joined child labels ("ε" for the root).
    - before: Redex in surface syntax.
    - after: Contractum in surface syntax.
    """

    n: int
    rule: str
    path: str
    before: str
    after: str


class NormalizeReport(BaseModel):
    term: str
    type: str
    normal_form: str
    value: typing.Optional[str] = None
    steps: int
    trace: typing.List[StepRecord] = Field(default_factory=list)


class WitnessReport(BaseModel):
    """Substitution and normal forms separating two terms."""

    reason: str
    substitution: typing.Dict[str, str] = Field(default_factory=dict)
    lhs_nf: typing.Optional[str] = None
    rhs_nf: typing.Optional[str] = None
    path: typing.Optional[str] = None


class EqReport(BaseModel):
    lhs: str
    rhs: str
    equal: bool
    trials: int
    seed: int
    lhs_nf: typing.Optional[str] = None
    rhs_nf: typing.Optional[str] = None
    witness: typing.Optional[WitnessReport] = None


class TheoremReport(BaseModel):
    """
    Outcome of checking one theorem or law instance.

    Attributes:
    - theorem: Checker name, e.g. "newton_leibniz".
    - inputs: The instance, each input in surface syntax.
    - lhs / rhs: The two sides that were compared.
    - lhs_nf / rhs_nf: Their normal forms read back through the base interpreter.
    - verdict: "true", "false", or "inconclusive" when a side ran out of fuel.
    - witness: Present when the verdict is "false".
    - extra: Named by-products, e.g. the Taylor partial sums or the computed increment.
    """

    theorem: str
    inputs: typing.Dict[str, str]
    lhs: str
    rhs: str
    lhs_nf: typing.Optional[str] = None
    rhs_nf: typing.Optional[str] = None
    verdict: Verdict
    witness: typing.Optional[WitnessReport] = None
    detail: typing.Optional[str] = None
    extra: typing.Dict[str, str] = Field(default_factory=dict)


class GradientReport(BaseModel):
    """Gradient of a function at a point and its products with each unit tuple."""

    function: str
    point: str
    gradient: str
    directional: typing.List[str] = Field(default_factory=list)


class SuiteSummary(BaseModel):
    suite: str
    cases: int
    failures: int
    inconclusive: int = 0
    elapsed: float
    seed: int
    failed_cases: typing.List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0
