use oddform_core::{matrix::Mat, ring::Ring, snf};
use std::time::Instant;

fn main() {
    let z = Ring::Z;
    let rows: Vec<Vec<i64>> = vec![
        vec![-2, 0, 0, 0, 0],
        vec![580736701674647, 475079097390964, -26604462013716, 580483275388910, 580736666588628],
        vec![185223047525789, 151524086528033, -8485359230361, 185142218487717, 185223036335276],
        vec![-519525678542923, -425004635873490, 23800288736855, -519298963987648, -519525647155064],
        vec![-277620228623344, -227110784029187, 12718219470804, -277499078602723, -277620211850534],
        vec![280627890118495, 229571240040067, -12856005176042, 280505427591743, 280627873163973],
        vec![-303116473051300, -247968313361777, 13886242542912, -302984196786187, -303116454738094],
        vec![-169833567551320, -138934525312939, 7780342939483, -169759454291226, -169833557290589],
        vec![-212389371364296, -173747845714277, 9729891267909, -212296687279824, -212389358532497],
        vec![350841816492431, 287010641871931, -16072615615269, 350688713480032, 350841795295829],
    ];
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    let m = Mat::from_rows(z, &refs);
    let t = Instant::now();
    let s = snf::smith_normal_form(&m).unwrap();
    eprintln!("snf in {:?} rank {} diag {:?}", t.elapsed(), s.rank(), s.diagonal());
    eprintln!("max entries: d={} u={} w={}", s.d.max_abs(), s.u.max_abs(), s.w.max_abs());
}
