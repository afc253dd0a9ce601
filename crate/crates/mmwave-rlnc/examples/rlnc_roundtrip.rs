//! Encode a message into random linear combinations and decode it back.
//!
//! Run with: cargo run --release --example rlnc_roundtrip

use mmwave_rlnc::gf::FieldContext;
use mmwave_rlnc::rlnc::{encode_intra, Decoder, Generation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let field = FieldContext::new(1024).unwrap();
    println!(
        "field GF({}) with reduction polynomial 0b{:b}",
        field.size(),
        field.reduction_polynomial()
    );

    let message = b"random linear combinations of a generation survive any k honest relays";
    let k = 6;
    let generation = Generation::from_bytes(&field, message, k).unwrap();
    println!(
        "generation: {} packets of {} symbols each",
        generation.size(),
        generation.symbol_len()
    );

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut decoder = Decoder::new(&field, k);
    let mut sent = 0;
    while !decoder.is_complete() {
        let packet = encode_intra(&field, &generation, &mut rng);
        sent += 1;
        let innovative = decoder.add(&packet).unwrap();
        println!(
            "packet {sent}: coeffs {:?} -> {}",
            packet.coeffs.iter().map(|c| c.value()).collect::<Vec<_>>(),
            if innovative {
                "innovative"
            } else {
                "redundant"
            }
        );
    }

    let decoded = decoder.extract().unwrap();
    let bytes: Vec<u8> = decoded
        .iter()
        .flatten()
        .map(|s| s.value() as u8)
        .take(message.len())
        .collect();
    assert_eq!(&bytes, message);
    println!(
        "decoded {} bytes from {sent} coded packets: \"{}\"",
        bytes.len(),
        String::from_utf8_lossy(&bytes)
    );
}
