import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simulcomp.dataset import (Dataset, Observation, cell_structure, dose_label,
                               load_csv, parse_csv)
from simulcomp.exceptions import DegenerateDesignError, SchemaError, ValidationError


def test_embedded_shape(liver):
    assert len(liver) == 120
    assert liver.dose_levels == ("0", "62.5", "125", "250", "500", "1000")
    assert liver.sex_levels == ("f", "m")


def test_embedded_first_rows(liver):
    male0 = liver.observations[0]
    assert (male0.sex, male0.dose, male0.body_weight, male0.liver_weight) == ("m", "0", 337.6, 10.73)
    female0 = liver.observations[60]
    assert (female0.sex, female0.dose, female0.body_weight, female0.liver_weight) == ("f", "0", 211.2, 6.76)


def test_embedded_cells(liver):
    cs = cell_structure(liver)
    assert len(cs) == 12
    assert cs.counts.tolist() == [10] * 12
    assert cs.labels[:2] == ["f:0", "f:62.5"]
    assert cs.labels[6] == "m:0"


def test_male_500_cell_mean(liver):
    # exact rational average of the ten bundled rows
    cs = cell_structure(liver)
    assert cs.means[cs.cells.index(("m", "500"))] == pytest.approx(2.914524926283987, abs=1e-12)


def test_single_row(tmp_path):
    p = tmp_path / "one.csv"
    p.write_text("Dose,BodyWt,LiverWt,Sex\n0,300,10,m\n")
    ds = load_csv(p)
    assert len(ds) == 1
    assert ds.observations[0].rel_liver == pytest.approx(10 / 3, rel=1e-15)
    cs = cell_structure(ds)
    assert cs.counts.tolist() == [1]
    assert cs.means[0] == pytest.approx(10 / 3)


def test_bad_sex_reports_row():
    with pytest.raises(ValidationError, match="row 3"):
        parse_csv("Dose,BodyWt,LiverWt,Sex\n0,300,10,m\n0,300,10,x\n")


def test_missing_column():
    with pytest.raises(SchemaError, match="LiverWt"):
        parse_csv("Dose,BodyWt,Sex\n0,300,m\n")


def test_non_numeric_weight():
    with pytest.raises(ValidationError, match="row 2.*BodyWt"):
        parse_csv("Dose,BodyWt,LiverWt,Sex\n0,heavy,10,m\n")


@pytest.mark.parametrize("text", ["", "Dose,BodyWt,LiverWt,Sex\n"])
def test_empty(text):
    with pytest.raises(ValidationError):
        parse_csv(text)


def test_missing_value_rejected():
    with pytest.raises(ValidationError, match="missing"):
        parse_csv("Dose,BodyWt,LiverWt,Sex\n0,,10,m\n")


def test_nonpositive_weight():
    with pytest.raises(ValidationError):
        parse_csv("Dose,BodyWt,LiverWt,Sex\n0,0,10,m\n")


def test_extra_columns_warn():
    with pytest.warns(UserWarning, match="Animal"):
        ds = parse_csv("Dose,BodyWt,LiverWt,Sex,Animal\n0,300,10,f,17\n")
    assert len(ds) == 1


def test_named_response():
    ds = parse_csv("Dose,Sex,Ratio\n0,f,1.5\n10,f,2.5\n", response="Ratio")
    assert ds.values("Ratio").tolist() == [1.5, 2.5]
    assert ds.dose_levels == ("0", "10")


def test_dose_order_is_numeric():
    ds = parse_csv("Dose,BodyWt,LiverWt,Sex\n1000,1,1,f\n62.5,1,1,f\n0,1,1,f\n125,1,1,f\n")
    assert ds.dose_levels == ("0", "62.5", "125", "1000")
    assert dose_label("62.50") == "62.5"


def test_empty_cell_named():
    ds = parse_csv("Dose,BodyWt,LiverWt,Sex\n0,1,1,f\n5,1,1,f\n0,1,1,m\n")
    with pytest.raises(DegenerateDesignError, match="m:5"):
        cell_structure(ds)


def test_round_trip(liver, tmp_path):
    p = tmp_path / "rt.csv"
    liver.to_csv(p)
    again = load_csv(p)
    assert again.observations == liver.observations
    assert again.dose_levels == liver.dose_levels
    assert again.sex_levels == liver.sex_levels


weights = st.floats(0.01, 1e4, allow_nan=False)


@settings(max_examples=100, deadline=None)
@given(bw=weights, lw=weights)
def test_rel_liver_scale_free(bw, lw):
    a = Observation("0", "f", bw, lw)
    b = Observation("0", "f", 2 * bw, 2 * lw)
    assert a.rel_liver == pytest.approx(100 * lw / bw, rel=1e-15)
    assert a.rel_liver == pytest.approx(b.rel_liver, rel=1e-15)


def test_observation_outside_levels():
    with pytest.raises(ValidationError):
        Dataset((Observation("0", "f", 1, 1),), dose_levels=("5",))


def test_subset_keeps_doses(liver):
    males = liver.subset("m")
    assert len(males) == 60
    assert males.sex_levels == ("m",)
    assert males.dose_levels == liver.dose_levels
