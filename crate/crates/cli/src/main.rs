fn main() {
    unimplemented!("command line entry point lands after the library surface");
}
