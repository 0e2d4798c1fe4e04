use gwsym::integrator::genus0_integral;
use gwsym::oracle::{dvv_bracket, dvv_value, string_dilaton_check, BracketTable};
use gwsym::{BracketQuery, Rational};

#[test]
fn genus_zero_slice_is_the_closed_form() {
    for n in 3..=8 {
        for q in BracketQuery::all(0, n) {
            assert_eq!(dvv_bracket(&q), genus0_integral(q.powers()).unwrap(), "{q}");
        }
    }
}

#[test]
fn symmetric_in_exponents() {
    for g in 1..=3 {
        for n in 1..=4 {
            for q in BracketQuery::all(g, n) {
                let mut k = q.powers().to_vec();
                k.rotate_left(1);
                assert_eq!(dvv_value(g, &k).unwrap(), dvv_bracket(&q));
                k.reverse();
                assert_eq!(dvv_value(g, &k).unwrap(), dvv_bracket(&q));
            }
        }
    }
}

#[test]
fn string_and_dilaton_examples() {
    assert_eq!(dvv_value(1, &[0, 2]).unwrap(), Rational::new(1, 24));
    assert_eq!(dvv_value(1, &[1, 1]).unwrap(), Rational::new(1, 24));
    assert!(dvv_value(1, &[0]).is_err());
    let mut t = BracketTable::new();
    t.populate(4, 5);
    assert!(string_dilaton_check(&mut t).unwrap() > 200);
}
